/* tslint:disable */
/* eslint-disable */

export class Cluster {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Energy after each outer step; the RVITE is appended as the last value.
     */
    energyTrace(s: number, iterations: number): Float64Array;
    constructor(particles: number, nu: number, seed: number);
    /**
     * RVITE for each of `scanFactors()`.
     */
    rviteScan(iterations: number): Float64Array;
}

export function potentialCurves(nu: number, r_min: number, r_max: number, samples: number): Float64Array;

export function scanFactors(): Uint32Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_cluster_free: (a: number, b: number) => void;
    readonly cluster_energyTrace: (a: number, b: number, c: number) => [number, number, number, number];
    readonly cluster_new: (a: number, b: number, c: number) => [number, number, number];
    readonly cluster_rviteScan: (a: number, b: number) => [number, number, number, number];
    readonly potentialCurves: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly scanFactors: () => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
