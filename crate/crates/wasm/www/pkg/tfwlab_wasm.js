/* @ts-self-types="./tfwlab_wasm.d.ts" */

export class AcceptanceHistogram {
    static __wrap(ptr) {
        const obj = Object.create(AcceptanceHistogram.prototype);
        obj.__wbg_ptr = ptr;
        AcceptanceHistogramFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        AcceptanceHistogramFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_acceptancehistogram_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get accepted() {
        const ret = wasm.__wbg_get_acceptancehistogram_accepted(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @returns {number}
     */
    get candidates() {
        const ret = wasm.__wbg_get_acceptancehistogram_candidates(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @returns {Uint32Array}
     */
    get counts() {
        const ret = wasm.__wbg_get_acceptancehistogram_counts(this.__wbg_ptr);
        var v1 = getArrayU32FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 4, 4);
        return v1;
    }
    /**
     * Bin edges of the standardized statistic, `counts.len() + 1` entries.
     * @returns {Float64Array}
     */
    get edges() {
        const ret = wasm.__wbg_get_acceptancehistogram_edges(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * Acceptance of a standard normal statistic at the same δ.
     * @returns {number}
     */
    get gaussian_rate() {
        const ret = wasm.__wbg_get_acceptancehistogram_gaussian_rate(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get rate() {
        const ret = wasm.__wbg_get_acceptancehistogram_rate(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {number} arg0
     */
    set accepted(arg0) {
        wasm.__wbg_set_acceptancehistogram_accepted(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set candidates(arg0) {
        wasm.__wbg_set_acceptancehistogram_candidates(this.__wbg_ptr, arg0);
    }
    /**
     * @param {Uint32Array} arg0
     */
    set counts(arg0) {
        const ptr0 = passArray32ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_acceptancehistogram_counts(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * Bin edges of the standardized statistic, `counts.len() + 1` entries.
     * @param {Float64Array} arg0
     */
    set edges(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_acceptancehistogram_edges(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * Acceptance of a standard normal statistic at the same δ.
     * @param {number} arg0
     */
    set gaussian_rate(arg0) {
        wasm.__wbg_set_acceptancehistogram_gaussian_rate(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set rate(arg0) {
        wasm.__wbg_set_acceptancehistogram_rate(this.__wbg_ptr, arg0);
    }
}
if (Symbol.dispose) AcceptanceHistogram.prototype[Symbol.dispose] = AcceptanceHistogram.prototype.free;

export class DecayProfile {
    static __wrap(ptr) {
        const obj = Object.create(DecayProfile.prototype);
        obj.__wbg_ptr = ptr;
        DecayProfileFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        DecayProfileFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_decayprofile_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get psi_rate() {
        const ret = wasm.__wbg_get_decayprofile_psi_rate(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get psi_rms() {
        const ret = wasm.__wbg_get_decayprofile_psi_rms(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * Shell centres measured from the edited site.
     * @returns {Float64Array}
     */
    get radii() {
        const ret = wasm.__wbg_get_decayprofile_radii(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * Fitted decay rates per lattice unit.
     * @returns {number}
     */
    get w_rate() {
        const ret = wasm.__wbg_get_decayprofile_w_rate(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get w_rms() {
        const ret = wasm.__wbg_get_decayprofile_w_rms(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @param {number} arg0
     */
    set psi_rate(arg0) {
        wasm.__wbg_set_decayprofile_psi_rate(this.__wbg_ptr, arg0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set psi_rms(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_decayprofile_psi_rms(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * Shell centres measured from the edited site.
     * @param {Float64Array} arg0
     */
    set radii(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_decayprofile_radii(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * Fitted decay rates per lattice unit.
     * @param {number} arg0
     */
    set w_rate(arg0) {
        wasm.__wbg_set_decayprofile_w_rate(this.__wbg_ptr, arg0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set w_rms(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_decayprofile_w_rms(this.__wbg_ptr, ptr0, len0);
    }
}
if (Symbol.dispose) DecayProfile.prototype[Symbol.dispose] = DecayProfile.prototype.free;

export class Heatmap {
    static __wrap(ptr) {
        const obj = Object.create(Heatmap.prototype);
        obj.__wbg_ptr = ptr;
        HeatmapFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        HeatmapFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_heatmap_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get energy_per_volume() {
        const ret = wasm.__wbg_get_heatmap_energy_per_volume(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get iterations() {
        const ret = wasm.__wbg_get_heatmap_iterations(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * Grid points per axis; `values` is row-major `n × n`.
     * @returns {number}
     */
    get n() {
        const ret = wasm.__wbg_get_heatmap_n(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * Occupancy of the lattice sites, row-major `l × l`.
     * @returns {Uint32Array}
     */
    get species() {
        const ret = wasm.__wbg_get_heatmap_species(this.__wbg_ptr);
        var v1 = getArrayU32FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 4, 4);
        return v1;
    }
    /**
     * @returns {number}
     */
    get theta() {
        const ret = wasm.__wbg_get_heatmap_theta(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get values() {
        const ret = wasm.__wbg_get_heatmap_values(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @param {number} arg0
     */
    set energy_per_volume(arg0) {
        wasm.__wbg_set_heatmap_energy_per_volume(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set iterations(arg0) {
        wasm.__wbg_set_heatmap_iterations(this.__wbg_ptr, arg0);
    }
    /**
     * Grid points per axis; `values` is row-major `n × n`.
     * @param {number} arg0
     */
    set n(arg0) {
        wasm.__wbg_set_heatmap_n(this.__wbg_ptr, arg0);
    }
    /**
     * Occupancy of the lattice sites, row-major `l × l`.
     * @param {Uint32Array} arg0
     */
    set species(arg0) {
        const ptr0 = passArray32ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_heatmap_species(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {number} arg0
     */
    set theta(arg0) {
        wasm.__wbg_set_heatmap_theta(this.__wbg_ptr, arg0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set values(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_heatmap_values(this.__wbg_ptr, ptr0, len0);
    }
}
if (Symbol.dispose) Heatmap.prototype[Symbol.dispose] = Heatmap.prototype.free;

/**
 * @param {number} l
 * @param {number} p_first
 * @param {number} delta
 * @param {number} candidates
 * @param {number} seed
 * @returns {AcceptanceHistogram}
 */
export function acceptanceHistogram(l, p_first, delta, candidates, seed) {
    const ret = wasm.acceptanceHistogram(l, p_first, delta, candidates, seed);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return AcceptanceHistogram.__wrap(ret[0]);
}

/**
 * @param {number} l
 * @param {number} p_first
 * @param {number} seed
 * @param {number} per_unit
 * @returns {DecayProfile}
 */
export function decayProfile(l, p_first, seed, per_unit) {
    const ret = wasm.decayProfile(l, p_first, seed, per_unit);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return DecayProfile.__wrap(ret[0]);
}

/**
 * @param {number} l
 * @param {number} p_first
 * @param {number} seed
 * @param {number} per_unit
 * @returns {Heatmap}
 */
export function solveHeatmap(l, p_first, seed, per_unit) {
    const ret = wasm.solveHeatmap(l, p_first, seed, per_unit);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return Heatmap.__wrap(ret[0]);
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg_Error_30c8987f7c2ed4e2: function(arg0, arg1) {
            const ret = Error(getStringFromWasm0(arg0, arg1));
            return ret;
        },
        __wbg___wbindgen_throw_41e9ee4f547fc59a: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
        },
        __wbindgen_init_externref_table: function() {
            const table = wasm.__wbindgen_externrefs;
            const offset = table.grow(4);
            table.set(0, undefined);
            table.set(offset + 0, undefined);
            table.set(offset + 1, null);
            table.set(offset + 2, true);
            table.set(offset + 3, false);
        },
    };
    return {
        __proto__: null,
        "./tfwlab_wasm_bg.js": import0,
    };
}

const AcceptanceHistogramFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_acceptancehistogram_free(ptr, 1));
const DecayProfileFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_decayprofile_free(ptr, 1));
const HeatmapFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_heatmap_free(ptr, 1));

function getArrayF64FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getFloat64ArrayMemory0().subarray(ptr / 8, ptr / 8 + len);
}

function getArrayU32FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getUint32ArrayMemory0().subarray(ptr / 4, ptr / 4 + len);
}

let cachedFloat64ArrayMemory0 = null;
function getFloat64ArrayMemory0() {
    if (cachedFloat64ArrayMemory0 === null || cachedFloat64ArrayMemory0.byteLength === 0) {
        cachedFloat64ArrayMemory0 = new Float64Array(wasm.memory.buffer);
    }
    return cachedFloat64ArrayMemory0;
}

function getStringFromWasm0(ptr, len) {
    return decodeText(ptr >>> 0, len);
}

let cachedUint32ArrayMemory0 = null;
function getUint32ArrayMemory0() {
    if (cachedUint32ArrayMemory0 === null || cachedUint32ArrayMemory0.byteLength === 0) {
        cachedUint32ArrayMemory0 = new Uint32Array(wasm.memory.buffer);
    }
    return cachedUint32ArrayMemory0;
}

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

function passArray32ToWasm0(arg, malloc) {
    const ptr = malloc(arg.length * 4, 4) >>> 0;
    getUint32ArrayMemory0().set(arg, ptr / 4);
    WASM_VECTOR_LEN = arg.length;
    return ptr;
}

function passArrayF64ToWasm0(arg, malloc) {
    const ptr = malloc(arg.length * 8, 8) >>> 0;
    getFloat64ArrayMemory0().set(arg, ptr / 8);
    WASM_VECTOR_LEN = arg.length;
    return ptr;
}

function takeFromExternrefTable0(idx) {
    const value = wasm.__wbindgen_externrefs.get(idx);
    wasm.__externref_table_dealloc(idx);
    return value;
}

let cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
cachedTextDecoder.decode();
const MAX_SAFARI_DECODE_BYTES = 2146435072;
let numBytesDecoded = 0;
function decodeText(ptr, len) {
    numBytesDecoded += len;
    if (numBytesDecoded >= MAX_SAFARI_DECODE_BYTES) {
        cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
        cachedTextDecoder.decode();
        numBytesDecoded = len;
    }
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

let WASM_VECTOR_LEN = 0;

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedFloat64ArrayMemory0 = null;
    cachedUint32ArrayMemory0 = null;
    cachedUint8ArrayMemory0 = null;
    wasm.__wbindgen_start();
    return wasm;
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (!module.ok) {
            throw new Error(`failed to fetch Wasm: ${module.status} ${module.statusText} fetching '${module.url}'`);
        }

        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);
            } catch (e) {
                const validResponse = expectedResponseType(module.type);

                if (validResponse && module.headers.get('Content-Type') !== 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else { throw e; }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);
    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };
        } else {
            return instance;
        }
    }

    function expectedResponseType(type) {
        switch (type) {
            case 'basic': case 'cors': case 'default': return true;
        }
        return false;
    }
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (module !== undefined) {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();
    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }
    const instance = new WebAssembly.Instance(module, imports);
    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (module_or_path !== undefined) {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (module_or_path === undefined) {
        module_or_path = new URL('tfwlab_wasm_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
