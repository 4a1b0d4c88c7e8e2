#include "pas/audit/report.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "pas/error.hpp"
#include "pas/util/text.hpp"

namespace pas::audit {

namespace {

std::optional<stats::KWResult> try_kw(const stats::GroupedSamples& groups, std::string* why) {
  try {
    return stats::kruskal_wallis(groups);
  } catch (const Error& e) {
    if (why) *why = e.what();
    return std::nullopt;
  }
}

}  // namespace

DistributionReport build_distribution_report(const AuditSession& session) {
  DistributionReport r;
  r.attribute = session.config.attribute;

  std::map<std::string, std::vector<const scorer::AlignmentSample*>> by_capture;
  std::size_t failed_samples = 0;
  for (const auto& s : session.samples) {
    if (s.failed) {
      ++failed_samples;
      continue;
    }
    by_capture[s.ad_ref].push_back(&s);
  }

  std::size_t failed_captures = 0;
  for (const auto& v : session.variants) {
    VariantScores vs;
    vs.label = v.label;
    vs.variant_id = v.variant_id;
    vs.persona_set = v.persona_set;
    vs.level = v.level;
    for (const auto& c : session.captures) {
      if (c.variant_id != v.variant_id) continue;
      if (!c.error.empty()) ++failed_captures;
      auto it = by_capture.find(c.id);
      if (it == by_capture.end()) continue;
      double sum = 0.0;
      for (const auto* s : it->second) {
        vs.points.push_back({c.id, s->score, s->repetition_index});
        vs.scores.push_back(s->score);
        sum += s->score;
      }
      vs.capture_means.push_back(sum / static_cast<double>(it->second.size()));
    }
    if (!vs.scores.empty()) vs.fit = stats::fit_normal(vs.scores);
    vs.sufficient = vs.scores.size() >= 2;
    if (!vs.sufficient) r.flags.push_back("insufficient_samples:" + vs.label);
    r.per_variant.push_back(std::move(vs));
  }

  stats::GroupedSamples groups;
  for (const auto& vs : r.per_variant) {
    if (vs.sufficient) groups.push_back({vs.label, vs.capture_means});
  }
  if (groups.size() >= 2) {
    std::string why;
    r.kw = try_kw(groups, &why);
    if (r.kw) {
      r.posthoc = stats::dunn_posthoc(groups, session.config.correction);
      for (const auto& pc : r.posthoc->pairs) {
        r.significance_marks.push_back(
            {pc.label_a, pc.label_b, pc.adjusted_p, std::string(stats::significance_mark(pc.adjusted_p))});
      }
    } else {
      r.flags.push_back("kw_unavailable:" + why);
    }
  } else {
    r.flags.push_back("kw_unavailable:fewer than two variants with samples");
  }

  // Same-level variants drawn from different persona sets.
  std::vector<std::string> level_order;
  std::map<std::string, std::vector<const VariantScores*>> by_level;
  for (const auto& vs : r.per_variant) {
    if (!by_level.count(vs.level)) level_order.push_back(vs.level);
    by_level[vs.level].push_back(&vs);
  }
  for (const auto& level : level_order) {
    const auto& members = by_level[level];
    std::set<std::string> sets;
    for (const auto* m : members) sets.insert(m->persona_set);
    if (sets.size() < 2) continue;
    SimilarCheck check;
    check.level = level;
    stats::GroupedSamples g;
    for (const auto* m : members) {
      check.labels.push_back(m->label);
      if (m->sufficient) g.push_back({m->label, m->capture_means});
    }
    if (g.size() >= 2) check.kw = try_kw(g, nullptr);
    check.consistent = check.kw && check.kw->p_value > 0.1;
    r.similar_persona.push_back(std::move(check));
  }

  for (const auto& cell : session.cells) {
    if (!cell.ok) r.gaps.push_back({cell.key, cell.error});
  }
  if (!r.gaps.empty()) r.flags.push_back("gaps:" + std::to_string(r.gaps.size()));
  if (failed_samples > 0) r.flags.push_back("failed_samples:" + std::to_string(failed_samples));
  if (failed_captures > 0) r.flags.push_back("failed_captures:" + std::to_string(failed_captures));
  r.partial = !r.gaps.empty() || !r.kw ||
              std::any_of(r.per_variant.begin(), r.per_variant.end(),
                          [](const VariantScores& v) { return !v.sufficient; });
  return r;
}

std::string format_report_table(const DistributionReport& r) {
  std::ostringstream os;
  os << "attribute: " << key(r.attribute) << "\n";
  std::size_t width = 7;
  for (const auto& v : r.per_variant) width = std::max(width, v.label.size());
  auto pad = [&](const std::string& s) { return s + std::string(width - std::min(width, s.size()), ' '); };
  os << pad("variant") << "  captures  samples  mean    std\n";
  for (const auto& v : r.per_variant) {
    os << pad(v.label) << "  " << v.capture_means.size() << std::string(10 - std::to_string(v.capture_means.size()).size(), ' ')
       << v.scores.size() << std::string(9 - std::to_string(v.scores.size()).size(), ' ')
       << util::format_fixed(v.fit.mean, 2) << "  " << util::format_fixed(v.fit.std, 2) << "\n";
  }
  if (r.kw) {
    os << "kruskal-wallis: H=" << util::format_fixed(r.kw->h_statistic, 4)
       << " df=" << r.kw->degrees_of_freedom << " p=" << util::format_fixed(r.kw->p_value, 6) << "\n";
  } else {
    os << "kruskal-wallis: unavailable\n";
  }
  for (const auto& m : r.significance_marks) {
    os << "  " << m.label_a << " vs " << m.label_b << ": p_adj=" << util::format_fixed(m.adjusted_p, 6)
       << (m.mark.empty() ? "" : " " + m.mark) << "\n";
  }
  for (const auto& s : r.similar_persona) {
    os << "similar personas (" << s.level << "): "
       << (s.kw ? "p=" + util::format_fixed(s.kw->p_value, 6) : std::string("unavailable"))
       << (s.consistent ? " consistent" : " inconsistent") << "\n";
  }
  for (const auto& f : r.flags) os << "flag: " << f << "\n";
  return os.str();
}

}  // namespace pas::audit
