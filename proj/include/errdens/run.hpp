#pragma once

#include "errdens/config.hpp"

namespace errdens {

//! Executes a run end to end and writes <output>.csv plus
//! <output>.meta.json. Estimate mode writes the (epsilon, f_hat) curve;
//! experiment modes write the per-replication table, with summary scalars
//! and the fully resolved configuration in the sidecar. Reruns with an
//! identical config produce byte-identical files.
void run(const RunConfig& config);

} // namespace errdens
