#pragma once

#include "ezdp/errors.hpp"
#include "ezdp/model.hpp"
#include "ezdp/operators.hpp"
#include "ezdp/solver.hpp"
#include "ezdp/dubounds.hpp"
#include "ezdp/policyeval.hpp"
