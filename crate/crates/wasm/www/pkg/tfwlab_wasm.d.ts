/* tslint:disable */
/* eslint-disable */

export class AcceptanceHistogram {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    accepted: number;
    candidates: number;
    counts: Uint32Array;
    /**
     * Bin edges of the standardized statistic, `counts.len() + 1` entries.
     */
    edges: Float64Array;
    /**
     * Acceptance of a standard normal statistic at the same δ.
     */
    gaussian_rate: number;
    rate: number;
}

export class DecayProfile {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    psi_rate: number;
    psi_rms: Float64Array;
    /**
     * Shell centres measured from the edited site.
     */
    radii: Float64Array;
    /**
     * Fitted decay rates per lattice unit.
     */
    w_rate: number;
    w_rms: Float64Array;
}

export class Heatmap {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    energy_per_volume: number;
    iterations: number;
    /**
     * Grid points per axis; `values` is row-major `n × n`.
     */
    n: number;
    /**
     * Occupancy of the lattice sites, row-major `l × l`.
     */
    species: Uint32Array;
    theta: number;
    values: Float64Array;
}

export function acceptanceHistogram(l: number, p_first: number, delta: number, candidates: number, seed: number): AcceptanceHistogram;

export function decayProfile(l: number, p_first: number, seed: number, per_unit: number): DecayProfile;

export function solveHeatmap(l: number, p_first: number, seed: number, per_unit: number): Heatmap;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_acceptancehistogram_free: (a: number, b: number) => void;
    readonly __wbg_decayprofile_free: (a: number, b: number) => void;
    readonly __wbg_get_acceptancehistogram_accepted: (a: number) => number;
    readonly __wbg_get_acceptancehistogram_candidates: (a: number) => number;
    readonly __wbg_get_acceptancehistogram_counts: (a: number) => [number, number];
    readonly __wbg_get_acceptancehistogram_edges: (a: number) => [number, number];
    readonly __wbg_get_acceptancehistogram_gaussian_rate: (a: number) => number;
    readonly __wbg_get_acceptancehistogram_rate: (a: number) => number;
    readonly __wbg_get_decayprofile_psi_rate: (a: number) => number;
    readonly __wbg_get_decayprofile_psi_rms: (a: number) => [number, number];
    readonly __wbg_get_decayprofile_radii: (a: number) => [number, number];
    readonly __wbg_get_decayprofile_w_rate: (a: number) => number;
    readonly __wbg_get_decayprofile_w_rms: (a: number) => [number, number];
    readonly __wbg_get_heatmap_energy_per_volume: (a: number) => number;
    readonly __wbg_get_heatmap_iterations: (a: number) => number;
    readonly __wbg_get_heatmap_n: (a: number) => number;
    readonly __wbg_get_heatmap_species: (a: number) => [number, number];
    readonly __wbg_get_heatmap_theta: (a: number) => number;
    readonly __wbg_get_heatmap_values: (a: number) => [number, number];
    readonly __wbg_heatmap_free: (a: number, b: number) => void;
    readonly __wbg_set_acceptancehistogram_accepted: (a: number, b: number) => void;
    readonly __wbg_set_acceptancehistogram_candidates: (a: number, b: number) => void;
    readonly __wbg_set_acceptancehistogram_counts: (a: number, b: number, c: number) => void;
    readonly __wbg_set_acceptancehistogram_edges: (a: number, b: number, c: number) => void;
    readonly __wbg_set_acceptancehistogram_gaussian_rate: (a: number, b: number) => void;
    readonly __wbg_set_acceptancehistogram_rate: (a: number, b: number) => void;
    readonly __wbg_set_decayprofile_psi_rate: (a: number, b: number) => void;
    readonly __wbg_set_decayprofile_psi_rms: (a: number, b: number, c: number) => void;
    readonly __wbg_set_decayprofile_radii: (a: number, b: number, c: number) => void;
    readonly __wbg_set_decayprofile_w_rate: (a: number, b: number) => void;
    readonly __wbg_set_decayprofile_w_rms: (a: number, b: number, c: number) => void;
    readonly __wbg_set_heatmap_energy_per_volume: (a: number, b: number) => void;
    readonly __wbg_set_heatmap_iterations: (a: number, b: number) => void;
    readonly __wbg_set_heatmap_n: (a: number, b: number) => void;
    readonly __wbg_set_heatmap_species: (a: number, b: number, c: number) => void;
    readonly __wbg_set_heatmap_theta: (a: number, b: number) => void;
    readonly __wbg_set_heatmap_values: (a: number, b: number, c: number) => void;
    readonly acceptanceHistogram: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly decayProfile: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly solveHeatmap: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
