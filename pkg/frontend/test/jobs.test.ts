import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient, Job } from "../src/api.js";
import { DEFAULT_POLL_DELAYS, pollJob } from "../src/jobs.js";

function clientWithStatuses(statuses: string[]): { client: ApiClient; calls: () => number } {
  let index = 0;
  const client = {
    getJob: async (): Promise<Job> => {
      const status = statuses[Math.min(index, statuses.length - 1)] ?? "done";
      index += 1;
      return { job_id: "job-1", eq_id: "eq-1", status, error: status === "failed" ? "broken" : null };
    },
  } as unknown as ApiClient;
  return { client, calls: () => index };
}

describe("pollJob", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("returns once the job reports done", async () => {
    const { client, calls } = clientWithStatuses(["expanding", "searching", "done"]);
    const result = pollJob(client, "s1", "job-1");
    await vi.advanceTimersByTimeAsync(1000); // after first poll
    await vi.advanceTimersByTimeAsync(2000); // after second poll
    const job = await result;
    expect(job.status).toBe("done");
    expect(calls()).toBe(3);
  });

  it("waits 1s first and backs off to a 5s ceiling", async () => {
    const { client, calls } = clientWithStatuses([
      "expanding", "expanding", "expanding", "expanding", "expanding",
      "expanding", "expanding", "done",
    ]);
    const result = pollJob(client, "s1", "job-1");
    await vi.advanceTimersByTimeAsync(0);
    expect(calls()).toBe(1);
    // Delay ladder: 1s, 2s, 3s, 4s, then 5s repeated.
    for (const [delay, expected] of [
      [1000, 2], [2000, 3], [3000, 4], [4000, 5], [5000, 6], [5000, 7], [5000, 8],
    ] as const) {
      await vi.advanceTimersByTimeAsync(delay - 1);
      expect(calls()).toBe(expected - 1);
      await vi.advanceTimersByTimeAsync(1);
      expect(calls()).toBe(expected);
    }
    expect((await result).status).toBe("done");
  });

  it("honors an injected delay schedule", async () => {
    const { client, calls } = clientWithStatuses(["expanding", "expanding", "done"]);
    const result = pollJob(client, "s1", "job-1", [5, 5]);
    await vi.advanceTimersByTimeAsync(10);
    expect((await result).status).toBe("done");
    expect(calls()).toBe(3);
  });

  it("throws the server error when the job fails", async () => {
    const { client } = clientWithStatuses(["failed"]);
    await expect(pollJob(client, "s1", "job-1", [1])).rejects.toThrow("broken");
  });

  it("exposes the documented default schedule", () => {
    expect(DEFAULT_POLL_DELAYS[0]).toBe(1000);
    expect(DEFAULT_POLL_DELAYS[DEFAULT_POLL_DELAYS.length - 1]).toBe(5000);
  });
});
