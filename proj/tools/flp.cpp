// Copyright 2026 The flp Authors
// SPDX-License-Identifier: Apache-2.0

#include "flp/cli.hpp"

int main(int argc, char** argv) { return flp::run_cli(argc, argv); }
