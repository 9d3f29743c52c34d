#pragma once

#include <map>
#include <string>

#include "inductor/value.hpp"

namespace inductor {

class BlicketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A classification of each known object description into on / off / undetermined.
// Keys are normalized descriptions; objects absent from the map are treated as
// undetermined when queried.
struct BlicketRule {
  std::map<std::string, Label> labels;
};

// Extracts the first balanced {...} object from the payload (surrounding prose
// tolerated) and parses it into a rule. Throws BlicketError when no balanced
// object is found or a value is outside the three labels.
BlicketRule parse_blicket_rule(const std::string& payload);

// Precedence: on > undetermined > off. Unknown objects count as undetermined.
Label apply_blicket(const BlicketRule& rule, const ObjectSet& objects);

}  // namespace inductor
