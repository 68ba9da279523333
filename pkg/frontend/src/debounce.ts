/** Trailing debounce: runs `op` once the calls stop for `delayMs`. */
export function debounced(op: () => void, delayMs: number): () => void {
    let handle: ReturnType<typeof setTimeout> | undefined;
    return () => {
        if (handle !== undefined) {
            clearTimeout(handle);
        }
        handle = setTimeout(op, delayMs);
    };
}
