#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "wmr/martingale.hpp"
#include "wmr/rearrangement.hpp"
#include "wmr/reverse.hpp"
#include "wmr/stability.hpp"

namespace wmr::io {

using Json = nlohmann::ordered_json;

/// `atom,weight` per line; optional header, blank lines and '#' comments.
DiscreteMeasure parse_measure_csv(const std::string& text, const std::string& origin = "<input>");
DiscreteMeasure read_measure_csv(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// %.16e, so every value round-trips.
std::string fmt(double x);

Json to_json(const DiscreteMeasure& m);
Json to_json(const Interval& I);
Json to_json(const std::vector<Interval>& v);
Json to_json(const MonotoneMap& map);
Json to_json(const OrderVerdict& v);
Json to_json(const AdmissibilityReport& r);
Json to_json(const Slope1Report& r);
Json to_json(const CertificateReport& r);

Json solution_document(const WeakSolution& s);
Json reverse_document(const ReverseSolution& r);
Json coupling_document(const Coupling& c);
Json stability_document(const StabilityReport& r);

std::string coupling_csv(const Coupling& c);
std::string stability_csv(const StabilityReport& r);

/// Documents are printed with two-space indentation and a trailing newline.
std::string dump(const Json& doc);

}  // namespace wmr::io
