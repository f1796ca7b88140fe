# E2E tests for jdzsl
