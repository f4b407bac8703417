#pragma once

#include "coarse/actions.hpp"
#include "coarse/io.hpp"
#include "coarse/pipeline.hpp"
#include "coarse/property_a.hpp"

#include <string>

namespace coarse {

// JSON views of verdicts. Rationals are "p/q" strings; point references use
// window ids. Key order is fixed so identical inputs give identical bytes.

Json pair_json(const MetricWindow& w, const std::optional<std::pair<std::size_t, std::size_t>>& p);

Json to_json(const MetricVerdict& v, const MetricWindow& w);
Json to_json(const ProperCheck& v, const GroupModel& g);
Json to_json(const CocompactCheck& v, const MetricWindow& w);
Json to_json(const WitnessVerdict& v, const MetricWindow& w);
Json to_json(const VariationVerdict& v, const MetricWindow& w);
Json to_json(const PsdVerdict& v);
Json to_json(const SupportVerdict& v, const MetricWindow& w);
Json to_json(const PropertyAReport& r);
Json to_json(const PipelineReport& r);

std::string to_text(const PipelineReport& r);

/// Two-space indented JSON with a trailing newline.
std::string dump(const Json& j);

}  // namespace coarse
