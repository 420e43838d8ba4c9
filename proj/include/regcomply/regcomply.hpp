#pragma once

#include "regcomply/core.hpp"
#include "regcomply/errors.hpp"
#include "regcomply/geometry.hpp"
#include "regcomply/ksupport.hpp"
#include "regcomply/optimizer.hpp"
#include "regcomply/oracle.hpp"
#include "regcomply/random.hpp"
#include "regcomply/rip.hpp"
#include "regcomply/sampler.hpp"

namespace regcomply {
inline constexpr const char* kVersion = "0.1.0";
}
