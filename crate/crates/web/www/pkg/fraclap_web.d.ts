/* tslint:disable */
/* eslint-disable */

export class Curve {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly du: Float64Array;
    /**
     * Largest deviation from the closed form on the plotted points, or NaN.
     */
    readonly error: number;
    /**
     * Closed form where one exists, otherwise NaN.
     */
    readonly exact: Float64Array;
    readonly order: string;
    readonly u: Float64Array;
    readonly x: Float64Array;
}

export class FftComparison {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly dft: Float64Array;
    /**
     * Largest error of the DFT result against the closed form.
     */
    readonly dft_error: number;
    /**
     * Largest gap between the two methods inside the cutoff.
     */
    readonly max_difference: number;
    readonly spectral: Float64Array;
    readonly x: Float64Array;
}

export class Soliton {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly converged: boolean;
    readonly mass: number;
    /**
     * Orders passed through, the target last.
     */
    readonly orders: string[];
    readonly peak: number;
    readonly profile: Float64Array;
    /**
     * Newton residual history of the final stage.
     */
    readonly residuals: Float64Array;
    readonly x: Float64Array;
}

/**
 * The Lorentzian differentiated both ways, the DFT on the torus
 * `[-πL, πL)` with `2^log2_len` samples.
 */
export function compare_fft(alpha: string, half_period: number, log2_len: number, half_width: number): FftComparison;

/**
 * `D^α` of a builtin function (`lorentz`, `gauss`, `powerlaw`) on
 * `samples` points of `[-half_width, half_width]`.
 */
export function derivative_curve(alpha: string, func: string, b: number, n: number, half_width: number, samples: number): Curve;

/**
 * Solitary wave `Q + D^αQ = Q²/2` of speed one, continued from the α = 1
 * profile with degree `n` in every domain.
 */
export function solve_soliton(alpha: string, n: number, half_width: number, samples: number): Soliton;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_curve_free: (a: number, b: number) => void;
    readonly __wbg_fftcomparison_free: (a: number, b: number) => void;
    readonly __wbg_soliton_free: (a: number, b: number) => void;
    readonly compare_fft: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly curve_du: (a: number) => [number, number];
    readonly curve_error: (a: number) => number;
    readonly curve_exact: (a: number) => [number, number];
    readonly curve_order: (a: number) => [number, number];
    readonly curve_u: (a: number) => [number, number];
    readonly curve_x: (a: number) => [number, number];
    readonly derivative_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
    readonly fftcomparison_dft: (a: number) => [number, number];
    readonly fftcomparison_dft_error: (a: number) => number;
    readonly fftcomparison_max_difference: (a: number) => number;
    readonly fftcomparison_spectral: (a: number) => [number, number];
    readonly fftcomparison_x: (a: number) => [number, number];
    readonly soliton_converged: (a: number) => number;
    readonly soliton_mass: (a: number) => number;
    readonly soliton_orders: (a: number) => [number, number];
    readonly soliton_peak: (a: number) => number;
    readonly soliton_profile: (a: number) => [number, number];
    readonly soliton_residuals: (a: number) => [number, number];
    readonly soliton_x: (a: number) => [number, number];
    readonly solve_soliton: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_drop_slice: (a: number, b: number) => void;
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
