#include "hamrep/util.hpp"
