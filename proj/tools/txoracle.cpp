// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#include "txoracle/cli.hpp"

int main(int argc, char** argv) { return txoracle::cli::run(argc, argv); }
