#pragma once

#include <winnowopt/error.hpp>
#include <winnowopt/rational.hpp>
#include <winnowopt/schema.hpp>
#include <winnowopt/formula.hpp>
#include <winnowopt/solver.hpp>
#include <winnowopt/preference.hpp>
#include <winnowopt/relation.hpp>
#include <winnowopt/dependency.hpp>
#include <winnowopt/winnow.hpp>
#include <winnowopt/plan.hpp>
#include <winnowopt/semopt.hpp>
#include <winnowopt/csv.hpp>
#include <winnowopt/dsl.hpp>
