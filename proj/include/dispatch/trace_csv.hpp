#pragma once

#include "dispatch/distsim.hpp"

#include <ostream>
#include <string>

namespace dispatch {

inline constexpr const char* kTraceCsvHeader =
    "t,node,lambda,x_hat,grad,mismatch,cost,lyapunov,disagreement";

/// One row per (time, node) with the block aggregates repeated on every row.
/// Numbers are printed with std::to_chars: shortest round-trip form, no locale.
void write_trace_csv(std::ostream& os, const Trace& trace);
void write_trace_csv(const std::string& path, const Trace& trace);

}  // namespace dispatch
