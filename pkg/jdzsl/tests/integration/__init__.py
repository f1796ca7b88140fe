# Integration tests for jdzsl
