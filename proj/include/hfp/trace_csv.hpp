#pragma once

#include "hfp/solver.hpp"
#include "hfp/text.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hfp {

inline constexpr const char* kTraceHeader =
    "n,alpha,beta,step_norm,fix_residual,vi_residual,dist_to_reference,elapsed_ns";

inline void write_trace_row(std::ostream& out, const TraceRow& row) {
    out << row.n << ',' << text::format_double(row.alpha) << ',' << text::format_double(row.beta) << ','
        << text::format_double(row.step_norm) << ',' << text::format_double(row.fix_residual) << ',';
    if (row.vi_residual) out << text::format_double(*row.vi_residual);
    out << ',';
    if (row.dist_to_reference) out << text::format_double(*row.dist_to_reference);
    out << ',';
    if (row.elapsed_ns) out << *row.elapsed_ns;
    out << '\n';
}

/// Streams trace rows to a CSV file, flushing every `flush_every` rows and
/// on destruction.
class TraceWriter {
public:
    explicit TraceWriter(const std::string& path, std::size_t flush_every = 1000)
        : out_(path, std::ios::binary | std::ios::trunc), flush_every_(flush_every) {
        if (!out_) throw std::runtime_error("cannot open trace file '" + path + "'");
        out_ << kTraceHeader << '\n';
    }

    TraceWriter(const TraceWriter&) = delete;
    TraceWriter& operator=(const TraceWriter&) = delete;

    ~TraceWriter() { out_.flush(); }

    void write(const TraceRow& row) {
        write_trace_row(out_, row);
        if (++pending_ >= flush_every_) {
            out_.flush();
            pending_ = 0;
        }
        ++rows_;
    }

    std::size_t rows() const { return rows_; }

private:
    std::ofstream out_;
    std::size_t flush_every_;
    std::size_t pending_ = 0;
    std::size_t rows_ = 0;
};

} // namespace hfp
