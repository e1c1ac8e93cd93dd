#pragma once

namespace nlts {

/// Measurement / check basis. Z-side objects (H_z, C_z, G_z) pair with the
/// standard basis, X-side objects with the Hadamard basis.
enum class Basis { X, Z };

constexpr const char* basis_name(Basis b) { return b == Basis::X ? "X" : "Z"; }

}  // namespace nlts
