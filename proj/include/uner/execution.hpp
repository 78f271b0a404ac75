#pragma once

namespace uner {

/// Corpus-level kernels run documents in parallel with OpenMP by default.
/// The serial path is the reference the parallel one is tested against.
enum class Execution { serial, parallel };

}  // namespace uner
