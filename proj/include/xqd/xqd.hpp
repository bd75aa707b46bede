#pragma once

/// \file xqd.hpp
/// Umbrella header: exact quantum discord of two-qubit X states via
/// steering-ellipse geometry, with brute-force oracles for validation.

#include "xqd/core.hpp"
#include "xqd/curve.hpp"
#include "xqd/discord.hpp"
#include "xqd/errors.hpp"
#include "xqd/geometry.hpp"
#include "xqd/oracle.hpp"
#include "xqd/parallel.hpp"
