#include "salodom/error.hpp"

namespace salodom {

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace salodom
