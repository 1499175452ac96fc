/**
 * Optimistic mutation helper: apply the change to local state right away,
 * run the server call in the background, revert on failure. The caller's
 * reconcile step (a snapshot refresh) runs after success so local state
 * never drifts from the server.
 */

export interface OptimisticOptions<T> {
  /** Apply the change immediately; returns a snapshot for revert. */
  apply: () => T;
  /** Perform the actual server call. */
  remote: () => Promise<void>;
  /** Undo the local change if the server call fails. */
  revert: (snapshot: T) => void;
  /** Called after a failed revert, e.g. to show an error cue. */
  onError?: (error: Error) => void;
}

export async function optimistic<T>(options: OptimisticOptions<T>): Promise<boolean> {
  const snapshot = options.apply();
  try {
    await options.remote();
    return true;
  } catch (error) {
    options.revert(snapshot);
    options.onError?.(error instanceof Error ? error : new Error(String(error)));
    return false;
  }
}
