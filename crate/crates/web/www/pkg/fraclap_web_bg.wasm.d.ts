/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_curve_free: (a: number, b: number) => void;
export const __wbg_fftcomparison_free: (a: number, b: number) => void;
export const __wbg_soliton_free: (a: number, b: number) => void;
export const compare_fft: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const curve_du: (a: number) => [number, number];
export const curve_error: (a: number) => number;
export const curve_exact: (a: number) => [number, number];
export const curve_order: (a: number) => [number, number];
export const curve_u: (a: number) => [number, number];
export const curve_x: (a: number) => [number, number];
export const derivative_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
export const fftcomparison_dft: (a: number) => [number, number];
export const fftcomparison_dft_error: (a: number) => number;
export const fftcomparison_max_difference: (a: number) => number;
export const fftcomparison_spectral: (a: number) => [number, number];
export const fftcomparison_x: (a: number) => [number, number];
export const soliton_converged: (a: number) => number;
export const soliton_mass: (a: number) => number;
export const soliton_orders: (a: number) => [number, number];
export const soliton_peak: (a: number) => number;
export const soliton_profile: (a: number) => [number, number];
export const soliton_residuals: (a: number) => [number, number];
export const soliton_x: (a: number) => [number, number];
export const solve_soliton: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_drop_slice: (a: number, b: number) => void;
export const __wbindgen_start: () => void;
