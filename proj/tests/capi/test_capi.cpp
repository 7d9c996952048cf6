#include "hkverify.h"
int main(){return 0;}
