// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>
