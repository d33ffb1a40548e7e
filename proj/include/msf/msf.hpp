// Umbrella header.
#pragma once

#include "msf/analytics.hpp"
#include "msf/codec.hpp"
#include "msf/counters.hpp"
#include "msf/errors.hpp"
#include "msf/experiments.hpp"
#include "msf/hash_family.hpp"
#include "msf/io.hpp"
#include "msf/outcome.hpp"
#include "msf/packed_cells.hpp"
#include "msf/shifting_filter.hpp"
#include "msf/spatial_filter.hpp"
#include "msf/workload.hpp"
