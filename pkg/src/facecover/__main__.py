from facecover.cli import main

main()
