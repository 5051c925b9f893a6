import { defineConfig } from "vite";

export default defineConfig({
  build: {
    outDir: "dist",
    emptyOutDir: true,
  },
  server: {
    proxy: {
      // dev mode: talk to a locally running `phishforge serve`
      "/features": "http://127.0.0.1:8440",
      "/analyze": "http://127.0.0.1:8440",
      "/generate": "http://127.0.0.1:8440",
      "/bundles": "http://127.0.0.1:8440",
    },
  },
});
