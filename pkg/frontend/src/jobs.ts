import { ApiClient, Job } from "./api.js";

// Job status polling: 1s between checks, backing off to 5s. No websockets.
export const DEFAULT_POLL_DELAYS = [1000, 2000, 3000, 4000, 5000];

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

/**
 * Poll one exploration job until it settles. Resolves with the final job
 * record on success and throws on failure. The delay schedule is
 * injectable so tests can run without real waits; the last entry repeats.
 */
export async function pollJob(
  client: ApiClient,
  sessionId: string,
  jobId: string,
  delays: number[] = DEFAULT_POLL_DELAYS,
): Promise<Job> {
  let attempt = 0;
  for (;;) {
    const job = await client.getJob(sessionId, jobId);
    if (job.status === "done") return job;
    if (job.status === "failed") {
      throw new Error(job.error ?? `exploration job ${jobId} failed`);
    }
    const delay = delays[Math.min(attempt, delays.length - 1)] ?? 1000;
    attempt += 1;
    await sleep(delay);
  }
}
