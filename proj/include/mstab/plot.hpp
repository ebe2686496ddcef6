#pragma once

#include "mstab/pipeline.hpp"

#include <string>

namespace mstab {

/// Three-row scan summary as a self-contained SVG 1.1 document:
/// quality and community count, NVI(t) with the NVI(t,t') heatmap, and
/// Block NVI with basins and the selected scales marked.
void plot_summary(const ScanResult& result, const std::string& path);
std::string summary_svg(const ScanResult& result);

/// Log-log per-stage timings against edge count, with an O(E) reference line.
void plot_benchmark(const BenchmarkReport& report, const std::string& path);
std::string benchmark_svg(const BenchmarkReport& report);

}  // namespace mstab
