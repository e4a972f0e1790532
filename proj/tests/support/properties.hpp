#pragma once

#include <functional>
#include <string>
#include <vector>

namespace props {

/// A named invariant. `check` returns an empty string on success and a
/// description of the first few violations otherwise.
struct Property {
  std::string module;
  std::string name;
  std::function<std::string()> check;
};

const std::vector<Property>& all();

}  // namespace props
