#pragma once
// Check reports shared by the validation and verification layers.

#include <string>
#include <vector>

namespace cusplab {

// Absolute tolerance for margins at analytic equality points: a check
// passes iff margin >= -kTolEq.
inline constexpr double kTolEq = 1e-10;

struct CheckItem {
  std::string id;      // stable slug, e.g. "ineq_transport_weight"
  std::string domain;  // human description of where it was evaluated
  double margin = 0.0;  // >= 0 means satisfied (bound minus achieved value)
  double location = 0.0;  // worst point (y or x), if meaningful
  bool pass = false;
  std::string note;
};

struct VerifyReport {
  std::vector<CheckItem> items;

  CheckItem& add(std::string id, std::string domain, double margin,
                 double location, std::string note = "") {
    CheckItem it;
    it.id = std::move(id);
    it.domain = std::move(domain);
    it.margin = margin;
    it.location = location;
    it.pass = margin >= -kTolEq;
    it.note = std::move(note);
    items.push_back(std::move(it));
    return items.back();
  }

  bool all_pass() const {
    for (const auto& it : items)
      if (!it.pass) return false;
    return true;
  }
};

}  // namespace cusplab
