/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_simulation_free: (a: number, b: number) => void;
export const __wbg_stationaryprofile_free: (a: number, b: number) => void;
export const critical_diffusion: (a: number, b: number) => [number, number, number];
export const eigenvalues: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const simulation_advance: (a: number, b: number) => [number, number];
export const simulation_modes: (a: number) => number;
export const simulation_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const simulation_profile: (a: number, b: number) => [number, number];
export const simulation_psi: (a: number) => number;
export const simulation_time: (a: number) => number;
export const stationary_profile: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const stationaryprofile_iterations: (a: number) => number;
export const stationaryprofile_residual: (a: number) => number;
export const stationaryprofile_status: (a: number) => [number, number];
export const stationaryprofile_values: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
