/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_acceptancehistogram_free: (a: number, b: number) => void;
export const __wbg_decayprofile_free: (a: number, b: number) => void;
export const __wbg_get_acceptancehistogram_accepted: (a: number) => number;
export const __wbg_get_acceptancehistogram_candidates: (a: number) => number;
export const __wbg_get_acceptancehistogram_counts: (a: number) => [number, number];
export const __wbg_get_acceptancehistogram_edges: (a: number) => [number, number];
export const __wbg_get_acceptancehistogram_gaussian_rate: (a: number) => number;
export const __wbg_get_acceptancehistogram_rate: (a: number) => number;
export const __wbg_get_decayprofile_psi_rate: (a: number) => number;
export const __wbg_get_decayprofile_psi_rms: (a: number) => [number, number];
export const __wbg_get_decayprofile_radii: (a: number) => [number, number];
export const __wbg_get_decayprofile_w_rate: (a: number) => number;
export const __wbg_get_decayprofile_w_rms: (a: number) => [number, number];
export const __wbg_get_heatmap_energy_per_volume: (a: number) => number;
export const __wbg_get_heatmap_iterations: (a: number) => number;
export const __wbg_get_heatmap_n: (a: number) => number;
export const __wbg_get_heatmap_species: (a: number) => [number, number];
export const __wbg_get_heatmap_theta: (a: number) => number;
export const __wbg_get_heatmap_values: (a: number) => [number, number];
export const __wbg_heatmap_free: (a: number, b: number) => void;
export const __wbg_set_acceptancehistogram_accepted: (a: number, b: number) => void;
export const __wbg_set_acceptancehistogram_candidates: (a: number, b: number) => void;
export const __wbg_set_acceptancehistogram_counts: (a: number, b: number, c: number) => void;
export const __wbg_set_acceptancehistogram_edges: (a: number, b: number, c: number) => void;
export const __wbg_set_acceptancehistogram_gaussian_rate: (a: number, b: number) => void;
export const __wbg_set_acceptancehistogram_rate: (a: number, b: number) => void;
export const __wbg_set_decayprofile_psi_rate: (a: number, b: number) => void;
export const __wbg_set_decayprofile_psi_rms: (a: number, b: number, c: number) => void;
export const __wbg_set_decayprofile_radii: (a: number, b: number, c: number) => void;
export const __wbg_set_decayprofile_w_rate: (a: number, b: number) => void;
export const __wbg_set_decayprofile_w_rms: (a: number, b: number, c: number) => void;
export const __wbg_set_heatmap_energy_per_volume: (a: number, b: number) => void;
export const __wbg_set_heatmap_iterations: (a: number, b: number) => void;
export const __wbg_set_heatmap_n: (a: number, b: number) => void;
export const __wbg_set_heatmap_species: (a: number, b: number, c: number) => void;
export const __wbg_set_heatmap_theta: (a: number, b: number) => void;
export const __wbg_set_heatmap_values: (a: number, b: number, c: number) => void;
export const acceptanceHistogram: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const decayProfile: (a: number, b: number, c: number, d: number) => [number, number, number];
export const solveHeatmap: (a: number, b: number, c: number, d: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_start: () => void;
