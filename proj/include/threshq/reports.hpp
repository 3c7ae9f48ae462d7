#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "threshq/bounds.hpp"
#include "threshq/compact_circle.hpp"
#include "threshq/group_tree.hpp"
#include "threshq/quality.hpp"

namespace threshq {

/// Shortest round-trip decimal text for a double.
std::string format_number(double v);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

nlohmann::json to_json(const Rational& r);  // {"num": "...", "den": "..."}
nlohmann::json to_json(const QualityReport& r);
nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const LemmaCheck& r);
nlohmann::json to_json(const tree::BallQuality& r);
nlohmann::json to_json(const circle::AveragingResult& r);

/// Columns: theta,q,ci,exact,is_worst
std::string to_csv(const QualityReport& r);
/// Columns: kind,n,delta,value,ci,available,certified,method,witness
std::string to_csv(const std::vector<BoundReport>& rows);
/// Columns: k,y_size,yz_size,s_value,avg_quality,bound,holds
std::string to_csv(const std::vector<LemmaCheck>& rows);
/// Columns: theta,q,num,den (theta is the reduced word; empty for the identity)
std::string to_csv(const tree::BallQuality& r);
/// Columns: gamma,q,ci
std::string to_csv(const circle::AveragingResult& r);

}  // namespace threshq
