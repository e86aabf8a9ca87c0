import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    environment: 'jsdom',
    include: ['test/**/*.test.ts'],
    // the flow test boots the real scoring service
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
