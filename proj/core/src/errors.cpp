#include "evenlab/errors.hpp"

namespace evenlab {

void throw_structural(const std::string& what) { throw StructuralError(what); }
void throw_validation(const std::string& what) { throw ValidationError(what); }
void throw_capacity(const std::string& what) { throw CapacityError(what); }

}  // namespace evenlab
