#ifndef NEUTOMO_ERROR_HPP_
#define NEUTOMO_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace neutomo {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace neutomo

#endif  // NEUTOMO_ERROR_HPP_
