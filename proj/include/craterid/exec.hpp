#pragma once

namespace craterid {

/// Kernels that have an OpenMP path keep a serial reference next to it.
enum class Exec { serial, parallel };

}  // namespace craterid
