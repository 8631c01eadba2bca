#pragma once

#include "zzaloha/chain.hpp"
#include "zzaloha/metrics.hpp"
#include "zzaloha/model.hpp"
#include "zzaloha/optimize.hpp"
#include "zzaloha/serialize.hpp"
#include "zzaloha/simulate.hpp"
#include "zzaloha/stationary.hpp"
#include "zzaloha/sweep.hpp"
