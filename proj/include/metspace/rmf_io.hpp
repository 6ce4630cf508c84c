#pragma once

#include "metspace/fields.hpp"

#include <string>

namespace metspace {

enum class FieldKind { Metric, Ell, Scalar };

/// Kind recorded in the header of an .rmf file, without reading the payload.
FieldKind peek_kind(const std::string& path);

// .rmf layout: one UTF-8 header line
//   RMF1 dim=<d> shape=<s0,...> spacing=<h0,...> origin=<o0,...>
//        periodic=<b0,...> kind=<metric|ell|scalar>
// terminated by '\n', then a raw little-endian float64 payload (per node the
// upper-triangular entries in row order for metric/ell, one value for scalar),
// then one mask byte per node, then a CRC32 of the payload.  Round trips are
// bit-exact on the payload.

void write_field(const MetricField& g, const std::string& path);
void write_field(const EllField& b, const std::string& path);
void write_field(const ScalarField& u, const std::string& path);

MetricField read_metric_field(const std::string& path,
                              double sing_fraction_max = 1.0);
EllField read_ell_field(const std::string& path);
ScalarField read_scalar_field(const std::string& path);

}  // namespace metspace
