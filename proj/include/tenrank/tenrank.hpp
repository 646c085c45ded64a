// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "tenrank/tensor.hpp"
#include "tenrank/kruskal.hpp"
#include "tenrank/solver.hpp"
#include "tenrank/synth.hpp"
#include "tenrank/io.hpp"
#include "tenrank/media.hpp"
