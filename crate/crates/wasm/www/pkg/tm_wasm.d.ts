/* tslint:disable */
/* eslint-disable */

/**
 * Diagnostics, summary counts, events and a chronology for drawing.
 */
export function check(source: string): string;

/**
 * DOT text. `mode` is `static`, `dynamic` or `behavior`; `highlight` is a
 * comma-separated list of event ids for dynamic mode.
 */
export function render(source: string, mode: string, highlight: string): string;

export function sample(name: string): string | undefined;

/**
 * Names of the bundled sample models.
 */
export function samples(): string;

/**
 * Trace grouped by event, with tokens held per machine after each step.
 */
export function simulate(source: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly check: (a: number, b: number) => [number, number];
    readonly render: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly sample: (a: number, b: number) => [number, number];
    readonly samples: () => [number, number];
    readonly simulate: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
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
