/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <iostream>

#include "debloatfs/cli.hpp"

int main(int argc, char** argv)
{
    return debloatfs::cli::Run({argv + 1, argv + argc}, std::cout, std::cerr);
}
