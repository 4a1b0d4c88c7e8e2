#pragma once

#include <string>

#include "pas/audit/types.hpp"

namespace pas::audit {

// Scores grouped by planned variant. The Kruskal-Wallis test and Dunn's
// pairs run over per-capture mean scores: repetitions of one rating are not
// independent observations of the serving behaviour. Variants with fewer
// than two samples are left out of the tests and flagged.
DistributionReport build_distribution_report(const AuditSession& session);

// Plain-text summary for terminals.
std::string format_report_table(const DistributionReport& report);

}  // namespace pas::audit
