#pragma once

#include <iosfwd>
#include <string>

#include "taylorlab/kernel.hpp"

namespace taylorlab::kernel {

/// Everything a CLI invocation needs to reuse a built kernel: the defining
/// parameters, the dilate series of the base kernel, and the tail-moment
/// tables of the shifted root kernel.
struct KernelBundle {
    KernelSpec spec;
    MomentKernel base;
    RootKernel g;
    TailMomentTable tables;
};

/// Builds base kernel, root kernel and tables for the given spec.
KernelBundle build_bundle(const KernelSpec& spec, int table_exponent, double table_tol);

// JSON text format; doubles are written with round-trip precision, so a
// save/load cycle reproduces bit-identical coefficients.
void save_bundle(std::ostream& os, const KernelBundle& bundle);
void save_bundle_file(const std::string& path, const KernelBundle& bundle);
KernelBundle load_bundle(std::istream& is);
KernelBundle load_bundle_file(const std::string& path);

}  // namespace taylorlab::kernel
