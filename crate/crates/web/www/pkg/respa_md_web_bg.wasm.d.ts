/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_cluster_free: (a: number, b: number) => void;
export const cluster_energyTrace: (a: number, b: number, c: number) => [number, number, number, number];
export const cluster_new: (a: number, b: number, c: number) => [number, number, number];
export const cluster_rviteScan: (a: number, b: number) => [number, number, number, number];
export const potentialCurves: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const scanFactors: () => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
