// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lapa/assignment.hpp"
#include "lapa/channel.hpp"
#include "lapa/geometry.hpp"
#include "lapa/harness.hpp"
#include "lapa/interference.hpp"
#include "lapa/io.hpp"
#include "lapa/matrix.hpp"
#include "lapa/pilots.hpp"
#include "lapa/receiver.hpp"
#include "lapa/rng.hpp"
#include "lapa/training.hpp"
#include "lapa/version.hpp"
