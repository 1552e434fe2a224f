# MIMO wiretap secrecy toolkit: proper vs improper Gaussian signaling
