import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    environment: "node",
    // Window origin must match the service the replay test spawns, or
    // happy-dom's fetch applies CORS to every request.
    environmentOptions: { happyDOM: { url: "http://127.0.0.1:8931" } },
    testTimeout: 15000,
    hookTimeout: 60000,
  },
});
