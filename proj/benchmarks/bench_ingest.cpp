#include <benchmark/benchmark.h>

#include <sstream>

#include "pkiflow/flow_csv.hpp"
#include "pkiflow/rng.hpp"

using namespace pkiflow;

namespace {

std::string synthetic_csv(size_t rows, size_t cols) {
    Rng rng(3);
    std::ostringstream out;
    out << "Flow ID,Src IP,Dst IP";
    for (size_t j = 0; j < cols; ++j) out << ",feat_" << j;
    out << ",Label\n";
    for (size_t i = 0; i < rows; ++i) {
        out << "flow" << i << ",10.0.0.1,10.0.0.2";
        for (size_t j = 0; j < cols; ++j) {
            if ((i * cols + j) % 977 == 0) {
                out << ",Infinity";
            } else {
                out << "," << rng.next_normal() * 100.0;
            }
        }
        out << "," << (i % 50 == 0 ? "DE" : "NT") << "\n";
    }
    return out.str();
}

} // namespace

static void BM_ParseCsv(benchmark::State& state) {
    std::string csv = synthetic_csv(static_cast<size_t>(state.range(0)), 40);
    for (auto _ : state) {
        RawFlowTable table = parse_flow_csv(csv);
        benchmark::DoNotOptimize(table.row_count());
    }
    state.SetBytesProcessed(state.iterations() * csv.size());
}
BENCHMARK(BM_ParseCsv)->Arg(1000)->Arg(10000);

static void BM_IngestPipeline(benchmark::State& state) {
    std::string csv = synthetic_csv(static_cast<size_t>(state.range(0)), 40);
    for (auto _ : state) {
        RawFlowTable raw = parse_flow_csv(csv);
        auto [dropped, labels] = drop_identifier_columns(raw, IdentifierDropList::defaults());
        auto [table, log] = sanitize_values(dropped, labels, {});
        benchmark::DoNotOptimize(table.values.data.data());
    }
    state.SetBytesProcessed(state.iterations() * csv.size());
}
BENCHMARK(BM_IngestPipeline)->Arg(1000)->Arg(10000);
