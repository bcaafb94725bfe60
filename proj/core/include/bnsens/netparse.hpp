#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "bnsens/model.hpp"

namespace bnsens {

/// A parsed network file: format header plus a validated network.
struct NetworkDocument {
  std::string format_version;
  Network network;
  std::optional<std::string> description;
};

/// One evidence case tied to a companion network.
struct CaseDocument {
  std::string case_id;
  Evidence evidence;
};

/// Parses the JSON network format (see README). Throws SyntaxError with a
/// 1-based line/column for malformed text and semantic errors naming the
/// offending variable for structural problems. The returned document always
/// passes validate_network.
NetworkDocument parse_network(std::string_view text);

/// Structural parse only; numeric invariants are left to validate_network.
/// The validate command uses this to report violations as data.
NetworkDocument parse_network_unchecked(std::string_view text);

/// Lossless inverse of parse_network: probabilities are written as shortest
/// round-trip decimal literals, keys sorted.
std::string serialize_network(const NetworkDocument& doc);

/// Parses {"case_id": ..., "evidence": {var: value, ...}} against a network.
CaseDocument parse_case(std::string_view text, const Network& net);

std::string serialize_case(const CaseDocument& doc, const Network& net);

}  // namespace bnsens
