#include "dispatch/trace_csv.hpp"

#include "dispatch/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

namespace dispatch {

namespace {

void append_number(std::string& line, double v) {
    if (std::isnan(v)) {
        line += "nan";
        return;
    }
    if (std::isinf(v)) {
        line += v > 0 ? "inf" : "-inf";
        return;
    }
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw numeric_error("number formatting failed");
    line.append(buf, end);
}

}  // namespace

void write_trace_csv(std::ostream& os, const Trace& trace) {
    os << kTraceCsvHeader << "\n";
    std::string line;
    for (const auto& b : trace.blocks) {
        for (const auto& r : b.rows) {
            line.clear();
            append_number(line, b.t);
            line += ',';
            line += std::to_string(r.node);
            line += ',';
            append_number(line, r.lambda);
            line += ',';
            append_number(line, r.x_hat);
            line += ',';
            append_number(line, r.grad);
            line += ',';
            append_number(line, b.mismatch);
            line += ',';
            append_number(line, b.total_cost);
            line += ',';
            append_number(line, b.lyapunov);
            line += ',';
            append_number(line, b.disagreement);
            line += '\n';
            os << line;
        }
    }
}

void write_trace_csv(const std::string& path, const Trace& trace) {
    std::ofstream out(path);
    if (!out) throw instance_error("cannot write " + path);
    write_trace_csv(out, trace);
}

}  // namespace dispatch
