#pragma once

#include "unite/airbnb.hpp"
#include "unite/assign.hpp"
#include "unite/combinatorics.hpp"
#include "unite/errors.hpp"
#include "unite/estimators.hpp"
#include "unite/graph.hpp"
#include "unite/harness.hpp"
#include "unite/inference.hpp"
#include "unite/io.hpp"
#include "unite/oracle.hpp"
#include "unite/outcomes.hpp"
#include "unite/random.hpp"
#include "unite/verify.hpp"
