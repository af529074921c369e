/* tslint:disable */
/* eslint-disable */

/**
 * Time-dependent spectral run that the page advances frame by frame.
 */
export class Simulation {
    free(): void;
    [Symbol.dispose](): void;
    advance(duration: number): void;
    /**
     * Unit-mass constant state plus a seeded perturbation of the first 8 modes.
     */
    constructor(coeffs: Float64Array, diffusion: number, magnitude: number, seed: number);
    profile(points: number): Float64Array;
    readonly modes: number;
    readonly psi: number;
    readonly time: number;
}

export class StationaryProfile {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly iterations: number;
    readonly residual: number;
    readonly status: string;
    readonly values: Float64Array;
}

/**
 * Smallest `D` at which every mode of the constant state is stable.
 */
export function critical_diffusion(coeffs: Float64Array): number;

/**
 * `c_1..c_K` for the unit-mass constant state.
 */
export function eigenvalues(coeffs: Float64Array, diffusion: number, k_max: number): Float64Array;

/**
 * Fixed-point iteration from the default guess.
 */
export function stationary_profile(coeffs: Float64Array, diffusion: number, grid: number, forced_period: number): StationaryProfile;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_simulation_free: (a: number, b: number) => void;
    readonly __wbg_stationaryprofile_free: (a: number, b: number) => void;
    readonly critical_diffusion: (a: number, b: number) => [number, number, number];
    readonly eigenvalues: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly simulation_advance: (a: number, b: number) => [number, number];
    readonly simulation_modes: (a: number) => number;
    readonly simulation_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly simulation_profile: (a: number, b: number) => [number, number];
    readonly simulation_psi: (a: number) => number;
    readonly simulation_time: (a: number) => number;
    readonly stationary_profile: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly stationaryprofile_iterations: (a: number) => number;
    readonly stationaryprofile_residual: (a: number) => number;
    readonly stationaryprofile_status: (a: number) => [number, number];
    readonly stationaryprofile_values: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
