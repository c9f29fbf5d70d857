// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dscat/acoustic.hpp"
#include "dscat/boundary.hpp"
#include "dscat/config.hpp"
#include "dscat/core.hpp"
#include "dscat/farfield.hpp"
#include "dscat/geometry.hpp"
#include "dscat/harness.hpp"
#include "dscat/io.hpp"
#include "dscat/kernels.hpp"
#include "dscat/mie.hpp"
#include "dscat/quadrature.hpp"
#include "dscat/suite.hpp"
#include "dscat/volume.hpp"
