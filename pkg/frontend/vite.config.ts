import { defineConfig } from "vitest/config";

export default defineConfig({
  // Relative asset URLs so the bundle works under `tracepart serve --assets`.
  base: "./",
  build: {
    outDir: "dist",
    target: "es2022",
  },
  server: {
    // `npm run dev` against a locally running service.
    proxy: { "/api": "http://127.0.0.1:8000" },
  },
  test: {
    environment: "node",
    include: ["tests/**/*.test.ts"],
  },
});
